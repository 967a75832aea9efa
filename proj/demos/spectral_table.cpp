// Prints the spectral type and eigenvalues of each canonical sp(4) matrix, and of a
// random conjugate of it.

#include <cmath>
#include <cstdio>

#include "symplab/generators.hpp"
#include "symplab/spectral.hpp"

using namespace symplab;

int main() {
    const std::vector<std::pair<SpectralType, std::vector<double>>> rows{
        {SpectralType::ComplexSaddle, {1.2, 0.9}},
        {SpectralType::SaddleCenter, {std::cos(0.7), std::sin(0.7), 2.5}},
        {SpectralType::GenericCenter, {std::cos(0.4), std::sin(0.4), std::cos(1.9), std::sin(1.9)}},
        {SpectralType::DegeneratedCenter, {std::cos(1.1), std::sin(1.1)}}};
    const Matrix p = random_symplectic(7, 2, 0.5).matrix();
    for (const auto& [type, params] : rows) {
        const auto m = canonical_matrix(type, params);
        const SympMatrix c(p * m.matrix() * symplectic_inverse(p), 1e-8);
        std::printf("%-18s classify: %-18s conjugate: %-18s eigenvalues:", to_string(type).c_str(),
                    to_string(classify_sp4(m)).c_str(), to_string(classify_sp4(c)).c_str());
        for (const auto& z : symplectic_eigenvalues(m.matrix())) std::printf(" %+.3f%+.3fi", z.real(), z.imag());
        std::printf("\n");
    }
}
