#pragma once

#include "dbm/cli.hpp"
#include "dbm/io.hpp"
#include "dbm/parametrize.hpp"
