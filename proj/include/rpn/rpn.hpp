#pragma once

#include "model.hpp"
#include "analysis.hpp"
#include "semantics.hpp"
#include "cpn.hpp"
#include "translate.hpp"
#include "exec.hpp"
#include "correspondence.hpp"
#include "harness.hpp"
#include "io.hpp"
