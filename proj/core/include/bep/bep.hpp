#pragma once

#include "bep/common.hpp"
#include "bep/constraint_set.hpp"
#include "bep/convex_piece.hpp"
#include "bep/bifunction.hpp"
#include "bep/schedule.hpp"
#include "bep/prox.hpp"
#include "bep/resolvent.hpp"
#include "bep/solvers.hpp"
#include "bep/diagnostics.hpp"
#include "bep/experiment.hpp"
