#pragma once

#include "error.hpp"
#include "numlin.hpp"
#include "model.hpp"
#include "model_io.hpp"
#include "mesh.hpp"
#include "perturb.hpp"
#include "ep.hpp"
#include "circular_string.hpp"
#include "oracle.hpp"
#include "table.hpp"
