#pragma once

// Umbrella header.
#include "l2tor/rational.hpp"
#include "l2tor/word.hpp"
#include "l2tor/permutation.hpp"
#include "l2tor/presentation.hpp"
#include "l2tor/quotient.hpp"
#include "l2tor/catalog.hpp"
#include "l2tor/wordproblem.hpp"
#include "l2tor/groupring.hpp"
#include "l2tor/fkdet.hpp"
#include "l2tor/torsion.hpp"
#include "l2tor/asymptotics.hpp"
#include "l2tor/data.hpp"
#include "l2tor/plot.hpp"
#include "l2tor/u0v0.hpp"
#include "l2tor/verify.hpp"
