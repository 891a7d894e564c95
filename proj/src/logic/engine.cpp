#include "logt/logic/engine.hpp"

// Header-only facade; this unit anchors the library target.
