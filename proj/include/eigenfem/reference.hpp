#pragma once

// Serial reference versions of the parallel kernels. They are kept for
// equivalence tests and benchmarks, not used by the main path.

#include <span>
#include <vector>

#include "eigenfem/assembly.hpp"
#include "eigenfem/geometry.hpp"
#include "eigenfem/sparse.hpp"

namespace eigenfem::reference {

/// Element-by-element scatter in ascending element order.
AssembledSystem assemble_serial(const SimplicialMesh& mesh, const ProblemCoefficients& coeffs);

void multiply_serial(const SparseMatrix& A, std::span<const double> x, std::span<double> y);

std::vector<ElementGeometry> geometry_serial(const SimplicialMesh& mesh);

} // namespace eigenfem::reference
