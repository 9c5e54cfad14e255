#pragma once

// Straightforward serial kernels. Used by the tests and the benchmark as the
// baseline for the OpenMP versions in fields and pde.

#include "hlab/fields.hpp"

#include <vector>

namespace hlab::reference {

VectorField gradient(const ScalarField &f);
ScalarField laplacian(const ScalarField &f);
SymmetricMatrixField hessian(const ScalarField &f);
double integrate(const ScalarField &f);
void linear_rhs(const ScalarField &rho, const VectorField &drift, const ScalarField &reaction,
                std::vector<double> &out);

}  // namespace hlab::reference
