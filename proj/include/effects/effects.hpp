#pragma once

#include "effects/actors.hpp"
#include "effects/enumerate.hpp"
#include "effects/equivalence.hpp"
#include "effects/generate.hpp"
#include "effects/laws.hpp"
#include "effects/logic.hpp"
#include "effects/memory.hpp"
#include "effects/programs.hpp"
#include "effects/reducer.hpp"
#include "effects/sexp.hpp"
#include "effects/syntax.hpp"
#include "effects/verdict.hpp"
