#pragma once

#include "wmr/errors.hpp"
#include "wmr/params.hpp"
#include "wmr/linalg.hpp"
#include "wmr/dense.hpp"
#include "wmr/ghz_compact.hpp"
#include "wmr/measures.hpp"
#include "wmr/optimizer.hpp"
#include "wmr/fidelity.hpp"
#include "wmr/curves.hpp"
#include "wmr/parallel.hpp"
#include "wmr/oracle.hpp"
#include "wmr/experiment.hpp"
