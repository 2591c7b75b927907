#ifndef FVBS_ASSEMBLE_HPP
#define FVBS_ASSEMBLE_HPP

#include <vector>

#include "fvbs/bfunction.hpp"
#include "fvbs/mesh.hpp"
#include "fvbs/problem.hpp"
#include "fvbs/sparse.hpp"

namespace fvbs {

/// M v = S over the cell unknowns; Dirichlet data folded into the rhs.
struct LinearSystem {
    SparseMatrix matrix;
    std::vector<double> rhs;
};

/// Two algebraically equivalent flux forms. Primary is the defining form
/// tau [B(-s) v_K - B(s) v_Ks]; Equivalent splits diffusion and upwinded
/// convection, tau B(|s|)(v_K - v_Ks) + m(sigma)(U+ v_K - U- v_Ks), and is
/// kept as an independent assembly route for cross-checking.
enum class FluxForm { Primary, Equivalent };

LinearSystem assemble(const Mesh& mesh, const DiscreteData& data, const BFunction& B,
                      FluxForm form = FluxForm::Primary);

struct MMatrixReport {
    bool offdiag_nonpositive = false;
    bool diag_positive = false;
    bool rowsum_nonnegative = false;
    std::vector<int> strictly_dominant_rows;
};

MMatrixReport check_m_matrix(const LinearSystem& system);

/// Direct sparse solve with the residual contract
/// ||Mv - S||_inf <= tol (||S||_inf + ||M||_inf ||v||_inf).
std::vector<double> solve(const LinearSystem& system, double tol = 1e-12);

/// Edge flux F_{K,sigma} for the owner orientation, reconstructed from a
/// solution (zero on Neumann edges).
double edge_flux(const Mesh& mesh, const DiscreteData& data, const BFunction& B,
                 std::span<const double> v, int edge_id);

}  // namespace fvbs

#endif
