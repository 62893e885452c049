#pragma once

#include "bellcost/bisect.hpp"
#include "bellcost/curves.hpp"
#include "bellcost/entropy.hpp"
#include "bellcost/errors.hpp"
#include "bellcost/evaluate.hpp"
#include "bellcost/model.hpp"
#include "bellcost/model_json.hpp"
#include "bellcost/models.hpp"
#include "bellcost/oracle.hpp"
#include "bellcost/parallel.hpp"
#include "bellcost/simulate.hpp"
