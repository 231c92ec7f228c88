#pragma once

#include "eichler/report.hpp"
