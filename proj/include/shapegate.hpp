#pragma once

#include "shapegate/shape.hpp"
#include "shapegate/policy.hpp"
#include "shapegate/reflect.hpp"
#include "shapegate/gate.hpp"
#include "shapegate/runtime_schema.hpp"
#include "shapegate/dataset.hpp"
#include "shapegate/pipeline.hpp"
