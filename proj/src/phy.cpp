#include "marc/phy.hpp"

namespace marc {

std::vector<Complex> bpsk_map(const std::vector<std::uint8_t>& bits) {
    std::vector<Complex> out(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) out[i] = bpsk_map_bit(bits[i]);
    return out;
}

std::pair<double, double> alamouti_soft_decode(Complex y1, Complex y2, Complex h1, Complex h2,
                                               double n0) {
    Complex s1_tilde = std::conj(h1) * y1 + h2 * std::conj(y2);
    Complex s2_tilde = std::conj(h2) * y1 - h1 * std::conj(y2);
    double llr1 = 4.0 * s1_tilde.real() / n0;
    double llr2 = 4.0 * s2_tilde.real() / n0;
    return {llr1, llr2};
}

std::vector<std::vector<Complex>> rayleigh_block_fading(int rows, int links, Rng& rng) {
    std::vector<std::vector<Complex>> h(rows, std::vector<Complex>(links));
    for (int r = 0; r < rows; ++r)
        for (int l = 0; l < links; ++l) h[r][l] = rng.cgaussian(1.0);
    return h;
}

void awgn(std::vector<Complex>& samples, double n0, Rng& rng) {
    for (auto& s : samples) s += rng.cgaussian(n0);
}

} // namespace marc
