#pragma once

#include "mcaixi/agent.hpp"
#include "mcaixi/codec.hpp"
#include "mcaixi/context_tree.hpp"
#include "mcaixi/domains.hpp"
#include "mcaixi/environment.hpp"
#include "mcaixi/experiment.hpp"
#include "mcaixi/kt.hpp"
#include "mcaixi/model.hpp"
#include "mcaixi/pst.hpp"
#include "mcaixi/rng.hpp"
#include "mcaixi/search.hpp"
