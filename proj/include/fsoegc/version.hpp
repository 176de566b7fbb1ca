#pragma once

#define FSOEGC_VERSION "1.0.0"
