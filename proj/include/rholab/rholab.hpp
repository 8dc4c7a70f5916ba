// Copyright 2026 The rho-lab Authors
// SPDX-License-Identifier: Apache-2.0

/// @file rholab.hpp
/// @brief Umbrella header.

#pragma once

#include "rholab/core.hpp"
#include "rholab/quadrature.hpp"
#include "rholab/special.hpp"
#include "rholab/montecarlo.hpp"
#include "rholab/wavefunction.hpp"
#include "rholab/density.hpp"
#include "rholab/bounds.hpp"
#include "rholab/radial.hpp"
#include "rholab/extension.hpp"
#include "rholab/report.hpp"
