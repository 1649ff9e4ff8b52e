#ifndef PERIODLAB_TEST_CLASSIFIER_ORACLE_HPP
#define PERIODLAB_TEST_CLASSIFIER_ORACLE_HPP

#include <string>
#include <utility>
#include <vector>

namespace classifier_oracle
{

/// Every palindromic h = (h^{m,0}, ..., h^{0,m}) with 1 <= sum h <= mu_max,
/// for weights 1..m_max.
inline std::vector<std::pair<int, std::vector<int>>> palindromic_types(int mu_max, int m_max)
{
    std::vector<std::pair<int, std::vector<int>>> out;
    for (int m = 1; m <= m_max; ++m) {
        const int free = m / 2 + 1; // h[0..m/2] determine the rest
        std::vector<int> half(free, 0);
        while (true) {
            std::vector<int> h(m + 1);
            for (int k = 0; k <= m; ++k) {
                h[k] = half[k <= m / 2 ? k : m - k];
            }
            int mu = 0;
            for (int x : h) {
                mu += x;
            }
            if (mu >= 1 && mu <= mu_max) {
                out.emplace_back(m, h);
            }
            int k = 0;
            while (k < free && ++half[k] > mu_max) {
                half[k++] = 0;
            }
            if (k == free) {
                break;
            }
        }
    }
    return out;
}

/// The two Hermitian cases read off literally, p by p.
inline std::string direct_reading(int m, const std::vector<int> &h)
{
    auto hpq = [&](int p) { return h[m - p]; }; // h^{p, m-p}
    if (m % 2 == 1) {
        const int a = (m - 1) / 2;
        for (int p = 0; p <= m; ++p) {
            if (p != a && p != a + 1 && hpq(p) != 0) {
                return "No";
            }
        }
        return "Case1";
    }
    const int a = m / 2;
    if (hpq(a + 1) > 1) {
        return "No";
    }
    for (int p = 0; p <= m; ++p) {
        if (p != a - 1 && p != a && p != a + 1 && hpq(p) != 0) {
            return "No";
        }
    }
    return "Case2";
}

} // namespace classifier_oracle

#endif
