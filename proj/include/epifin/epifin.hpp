#pragma once

#include "epifin/epi_sir.hpp"
#include "epifin/errors.hpp"
#include "epifin/fundstats.hpp"
#include "epifin/gossip.hpp"
#include "epifin/io.hpp"
#include "epifin/matrix.hpp"
#include "epifin/netdiff.hpp"
#include "epifin/random.hpp"
#include "epifin/rdwave.hpp"
