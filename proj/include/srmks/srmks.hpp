#pragma once

#include "srmks/error.hpp"
#include "srmks/rng.hpp"
#include "srmks/oscillator.hpp"
#include "srmks/kernels.hpp"
#include "srmks/smoother.hpp"
#include "srmks/risk.hpp"
#include "srmks/srm.hpp"
#include "srmks/experiment.hpp"
#include "srmks/io.hpp"
#include "srmks/svg.hpp"
