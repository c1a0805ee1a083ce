#pragma once

#include "qnoise/bec_qnd.hpp"
#include "qnoise/constants.hpp"
#include "qnoise/cqnc.hpp"
#include "qnoise/errors.hpp"
#include "qnoise/lti.hpp"
#include "qnoise/mc_oracle.hpp"
#include "qnoise/parametric.hpp"
#include "qnoise/spectrum.hpp"
#include "qnoise/standard_oms.hpp"
