#include <pybind11/pybind11.h>

namespace py = pybind11;

PYBIND11_MODULE(_wwlab, m) {
    m.doc() = "compressible free-surface water-wave laboratory (placeholder)";
}
