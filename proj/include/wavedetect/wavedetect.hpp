#pragma once

#include "wavedetect/config.hpp"
#include "wavedetect/detector.hpp"
#include "wavedetect/dg_sources.hpp"
#include "wavedetect/dwt.hpp"
#include "wavedetect/error.hpp"
#include "wavedetect/filters.hpp"
#include "wavedetect/grid_synth.hpp"
#include "wavedetect/indices.hpp"
#include "wavedetect/report.hpp"
#include "wavedetect/spectral.hpp"
#include "wavedetect/svg.hpp"
#include "wavedetect/waveform_io.hpp"
