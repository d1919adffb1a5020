#pragma once

#include "zsslr/attr_influence.hpp"
#include "zsslr/class_embed.hpp"
#include "zsslr/closed_form.hpp"
#include "zsslr/compatibility.hpp"
#include "zsslr/data_model.hpp"
#include "zsslr/error.hpp"
#include "zsslr/eval.hpp"
#include "zsslr/lle.hpp"
#include "zsslr/model_io.hpp"
#include "zsslr/synth.hpp"
#include "zsslr/temporal_agg.hpp"
#include "zsslr/zsl_core.hpp"
