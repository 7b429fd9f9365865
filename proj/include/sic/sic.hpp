#pragma once

#include "sic/background.hpp"
#include "sic/graph.hpp"
#include "sic/interestingness.hpp"
#include "sic/mining.hpp"
#include "sic/mmc.hpp"
#include "sic/oracle.hpp"
#include "sic/steiner.hpp"
