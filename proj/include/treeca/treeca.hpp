#pragma once

#include "treeca/dynamics.hpp"
#include "treeca/errors.hpp"
#include "treeca/mod_matrix.hpp"
#include "treeca/modmath.hpp"
#include "treeca/render.hpp"
#include "treeca/reversibility.hpp"
#include "treeca/rule.hpp"
#include "treeca/sweep.hpp"
#include "treeca/tree.hpp"
