#pragma once

#include "dolfe/checks.hpp"
#include "dolfe/core.hpp"
#include "dolfe/dataio.hpp"
#include "dolfe/estimator.hpp"
#include "dolfe/events.hpp"
#include "dolfe/likelihood.hpp"
#include "dolfe/oracle.hpp"
#include "dolfe/version.hpp"
