#pragma once

#include "symfact/clustering.hpp"
#include "symfact/constraints.hpp"
#include "symfact/error.hpp"
#include "symfact/graph.hpp"
#include "symfact/linalg.hpp"
#include "symfact/objective.hpp"
#include "symfact/random.hpp"
#include "symfact/solver.hpp"
