#pragma once

#define MPARK_VERSION "1.0.0"
