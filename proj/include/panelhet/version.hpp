#pragma once

#define PANELHET_VERSION "0.1.0"
