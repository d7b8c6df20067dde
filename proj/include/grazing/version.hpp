#pragma once

#define GRAZING_VERSION "0.1.0"
