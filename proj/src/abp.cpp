#include "marc/abp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "marc/errors.hpp"
#include "marc/llr.hpp"

namespace marc {

namespace {
// Keeps atanh finite; caps a single check's contribution near 28.3.
constexpr double kTanhCap = 1.0 - 1e-12;
} // namespace

BitMatrix adapt_parity_matrix(const BitMatrix& h, const std::vector<int>& order,
                              std::vector<int>* pivots) {
    if (static_cast<int>(order.size()) != h.cols())
        throw LengthMismatch("adapt_parity_matrix: order must list every column");
    BitMatrix a = h;
    const int rows = a.rows();
    std::vector<char> used(rows, 0);
    std::vector<int> piv;
    piv.reserve(rows);
    for (int c : order) {
        if (static_cast<int>(piv.size()) == rows) break;
        int pr = -1;
        for (int r = 0; r < rows; ++r) {
            if (!used[r] && a.get(r, c)) {
                pr = r;
                break;
            }
        }
        if (pr < 0) continue; // dependent on the columns already reduced; skip
        used[pr] = 1;
        piv.push_back(c);
        for (int r = 0; r < rows; ++r)
            if (r != pr && a.get(r, c)) a.row_xor(r, pr);
    }
    if (pivots) *pivots = std::move(piv);
    return a;
}

std::vector<double> spa_extrinsic(const BitMatrix& h, const std::vector<double>& q,
                                  double damping) {
    if (static_cast<int>(q.size()) != h.cols())
        throw LengthMismatch("spa_extrinsic: LLR length != columns");
    std::vector<double> ext(q.size(), 0.0);
    std::vector<double> t, pre, post;
    for (int r = 0; r < h.rows(); ++r) {
        std::vector<int> support = h.row_support(r);
        const int w = static_cast<int>(support.size());
        if (w == 0) continue;
        t.resize(w);
        for (int i = 0; i < w; ++i) t[i] = std::tanh(0.5 * q[support[i]]);
        pre.assign(w, 1.0);
        post.assign(w, 1.0);
        for (int i = 1; i < w; ++i) pre[i] = pre[i - 1] * t[i - 1];
        for (int i = w - 2; i >= 0; --i) post[i] = post[i + 1] * t[i + 1];
        for (int i = 0; i < w; ++i) {
            double p = std::clamp(pre[i] * post[i], -kTanhCap, kTanhCap);
            ext[support[i]] += 2.0 * std::atanh(p);
        }
    }
    if (damping != 1.0)
        for (double& x : ext) x *= damping;
    return ext;
}

AbpDecoder::AbpDecoder(const RsCode& code, AbpConfig config)
    : code_(&code), config_(config), h_(code.binary_parity_check().matrix) {
    if (config_.inner_iterations < 1) throw ConfigError("abp: inner_iterations must be >= 1");
    if (config_.damping <= 0.0 || config_.damping > 1.0)
        throw ConfigError("abp: damping must be in (0, 1]");
    if (config_.llr_clip <= 0.0) throw ConfigError("abp: llr_clip must be positive");
}

AbpResult AbpDecoder::decode(const std::vector<double>& channel,
                             const std::vector<double>& prior) const {
    const int n = code_->codeword_bits();
    const int m = code_->field().m();
    if (static_cast<int>(channel.size()) != n)
        throw LengthMismatch("abp: channel LLR length != codeword bits");
    if (!prior.empty() && static_cast<int>(prior.size()) != n)
        throw LengthMismatch("abp: prior LLR length != codeword bits");

    std::vector<double> base = channel;
    if (!prior.empty())
        for (int i = 0; i < n; ++i) base[i] += prior[i];

    AbpResult res;
    res.extrinsic.assign(n, 0.0);
    std::vector<double> q(n);
    auto refresh_total = [&] {
        for (int i = 0; i < n; ++i) q[i] = clip_llr(base[i] + res.extrinsic[i], config_.llr_clip);
    };

    refresh_total();
    std::vector<int> order(n);
    for (int round = 0; round < config_.inner_iterations; ++round) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return std::fabs(q[a]) < std::fabs(q[b]); });
        BitMatrix adapted = adapt_parity_matrix(h_, order);
        std::vector<double> e = spa_extrinsic(adapted, q, config_.damping);
        for (int i = 0; i < n; ++i)
            res.extrinsic[i] = clip_llr(res.extrinsic[i] + e[i], config_.llr_clip);
        refresh_total();
        auto hard = hard_bits(q);
        auto word = bits_to_symbols(m, hard);
        if (code_->is_codeword(word)) {
            res.hard = std::move(hard);
            res.parity_satisfied = true;
            res.decoded = std::vector<Symbol>(word.begin(), word.begin() + code_->k());
            return res;
        }
    }

    res.hard = hard_bits(q);
    if (auto dec = code_->bm_decode(bits_to_symbols(m, res.hard))) res.decoded = dec->message;
    return res;
}

} // namespace marc
