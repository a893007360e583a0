#pragma once

#include "mvcp/diagnostics.hpp"
#include "mvcp/error.hpp"
#include "mvcp/io.hpp"
#include "mvcp/log.hpp"
#include "mvcp/similarity.hpp"
#include "mvcp/sym_ncp.hpp"
#include "mvcp/tensor.hpp"
#include "mvcp/tsne.hpp"
