#pragma once

#include "canon.hpp"
#include "correlation.hpp"
#include "double_description.hpp"
#include "errors.hpp"
#include "lift.hpp"
#include "linalg.hpp"
#include "lp.hpp"
#include "numeric.hpp"
#include "pipeline.hpp"
#include "polytope.hpp"
#include "quantum.hpp"
#include "render.hpp"
#include "scenario.hpp"
#include "serialize.hpp"
#include "symmetry.hpp"
#include "vertices.hpp"
