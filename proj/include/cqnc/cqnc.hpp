#pragma once

#include "cqnc/analytic.hpp"
#include "cqnc/commands.hpp"
#include "cqnc/config.hpp"
#include "cqnc/constants.hpp"
#include "cqnc/errors.hpp"
#include "cqnc/golden_section.hpp"
#include "cqnc/parallel.hpp"
#include "cqnc/params.hpp"
#include "cqnc/sensing.hpp"
#include "cqnc/statespace.hpp"
