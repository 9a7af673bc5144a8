#pragma once

#include "psra/analytics.hpp"
#include "psra/arrivals.hpp"
#include "psra/delay.hpp"
#include "psra/distance.hpp"
#include "psra/experiments.hpp"
#include "psra/histogram.hpp"
#include "psra/ingest.hpp"
#include "psra/queue.hpp"
#include "psra/rng.hpp"
#include "psra/service.hpp"
