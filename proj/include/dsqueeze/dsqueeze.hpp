#pragma once

#include "dsqueeze/errors.hpp"
#include "dsqueeze/units.hpp"
#include "dsqueeze/potentials.hpp"
#include "dsqueeze/oscillator.hpp"
#include "dsqueeze/channel_basis.hpp"
#include "dsqueeze/d_solver.hpp"
#include "dsqueeze/ext_solver.hpp"
#include "dsqueeze/equivalence.hpp"
#include "dsqueeze/config.hpp"
#include "dsqueeze/commands.hpp"
