#pragma once

#include "polygon_gpt/errors.hpp"
#include "polygon_gpt/linalg.hpp"
#include "polygon_gpt/polygon.hpp"
#include "polygon_gpt/composite.hpp"
#include "polygon_gpt/symmetry.hpp"
#include "polygon_gpt/parallel.hpp"
#include "polygon_gpt/enumerate.hpp"
#include "polygon_gpt/nonlocality.hpp"
#include "polygon_gpt/mixture.hpp"
