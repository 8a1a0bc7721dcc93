#pragma once

// Umbrella header: the whole simulator surface.

#include "memhtm/config.hpp"
#include "memhtm/config_file.hpp"
#include "memhtm/crossbar.hpp"
#include "memhtm/dataset.hpp"
#include "memhtm/experiment.hpp"
#include "memhtm/htm.hpp"
#include "memhtm/memristor.hpp"
#include "memhtm/pipeline.hpp"
#include "memhtm/rng.hpp"
#include "memhtm/sdr.hpp"
#include "memhtm/spatial_pooler.hpp"
#include "memhtm/temporal_memory.hpp"
#include "memhtm/topology.hpp"
