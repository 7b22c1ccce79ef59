#pragma once

#include "homog/grid.hpp"

/// Straightforward serial versions of the grid kernels. Written from the
/// index formulas with explicit modular wraparound; the tests check the
/// OpenMP kernels against these.
namespace homog::reference {

FaceField gradient(const CellField& v);
CellField divergence(const FaceField& f);
CellField apply_A(const EdgeCoefficientField& a, const CellField& v);
CellField assemble_f0(const EdgeCoefficientField& a, const Direction& xi);
double face_energy_average(const EdgeCoefficientField& a, const FaceField& grad_chi, const Direction& xi,
                           const AveragingWindow& window = AveragingWindow::full());

} // namespace homog::reference
