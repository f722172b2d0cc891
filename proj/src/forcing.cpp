#include "feop/forcing.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "feop/error.hpp"

namespace feop {

void ForcingFamily::validate() const {
    if (dim != 1 && dim != 2) throw std::invalid_argument("ForcingFamily: dim must be 1 or 2");
    if (!(m_lo <= m_hi) || !(n_lo <= n_hi)) {
        throw std::invalid_argument("ForcingFamily: empty parameter range");
    }
    if (!std::isfinite(m_lo) || !std::isfinite(m_hi) || !std::isfinite(n_lo) ||
        !std::isfinite(n_hi)) {
        throw std::invalid_argument("ForcingFamily: ranges must be finite");
    }
}

ForcingSample sample_forcing(const ForcingFamily& family, Rng& rng) {
    family.validate();
    ForcingSample s;
    s.dim = family.dim;
    if (family.dim == 1) {
        const double m0 = rng.uniform(family.m_lo, family.m_hi);
        const double n0 = rng.uniform(family.n_lo, family.n_hi);
        const double m1 = rng.uniform(family.m_lo, family.m_hi);
        const double n1 = rng.uniform(family.n_lo, family.n_hi);
        s.omega = {m0, n0, m1, n1};
    } else {
        const double m0 = rng.uniform(family.m_lo, family.m_hi);
        const double m1 = rng.uniform(family.m_lo, family.m_hi);
        const double n0 = rng.uniform(family.n_lo, family.n_hi);
        const double n1 = rng.uniform(family.n_lo, family.n_hi);
        const double n2 = rng.uniform(family.n_lo, family.n_hi);
        const double n3 = rng.uniform(family.n_lo, family.n_hi);
        s.omega = {m0, m1, n0, n1, n2, n3};
    }
    return s;
}

double eval_forcing(const ForcingSample& s, double x, double y) {
    if (s.dim == 1) {
        return s.omega[0] * std::sin(s.omega[1] * x) + s.omega[2] * std::cos(s.omega[3] * x);
    }
    return s.omega[0] * std::sin(s.omega[2] * x + s.omega[3] * y) +
           s.omega[1] * std::cos(s.omega[4] * x + s.omega[5] * y);
}

ScalarField forcing_field(const ForcingSample& sample) {
    return [sample](double x, double y) { return eval_forcing(sample, x, y); };
}

Dataset build_dataset(const ForcingFamily& family, int count, std::uint64_t seed,
                      const LoadAssembler& assemble) {
    if (count < 0) throw std::invalid_argument("build_dataset: negative count");
    family.validate();
    Dataset ds;
    ds.family = family;
    ds.seed = seed;
    Rng rng(seed);
    ds.samples.reserve(count);
    ds.loads.reserve(count);
    for (int m = 0; m < count; ++m) {
        ForcingSample s = sample_forcing(family, rng);
        LoadVector load = assemble(forcing_field(s));
        load.omega = s.omega;
        ds.samples.push_back(std::move(s));
        ds.loads.push_back(std::move(load));
    }
    return ds;
}

Dataset build_dataset_reaction(const ForcingFamily& family, int count, std::uint64_t seed,
                               const SystemAssembler& assemble) {
    if (count < 0) throw std::invalid_argument("build_dataset_reaction: negative count");
    family.validate();
    Dataset ds;
    ds.family = family;
    ds.seed = seed;
    Rng rng(seed);
    for (int m = 0; m < count; ++m) {
        ForcingSample s = sample_forcing(family, rng);
        auto [sys, load] = assemble(forcing_field(s));
        load.omega = s.omega;
        ds.samples.push_back(std::move(s));
        ds.loads.push_back(std::move(load));
        ds.systems.push_back(std::move(sys));
    }
    return ds;
}

void save_dataset(const Dataset& ds, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::invalid_argument("save_dataset: cannot open " + path);
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%s %d %.17g %.17g %.17g %.17g %llu %d\n",
                  ds.family.kind == InputKind::Forcing ? "forcing" : "reaction",
                  ds.family.dim, ds.family.m_lo, ds.family.m_hi, ds.family.n_lo,
                  ds.family.n_hi, static_cast<unsigned long long>(ds.seed), ds.size());
    os << buf;
    for (const auto& s : ds.samples) {
        for (std::size_t k = 0; k < s.omega.size(); ++k) {
            std::snprintf(buf, sizeof(buf), "%s%.17g", k == 0 ? "" : " ", s.omega[k]);
            os << buf;
        }
        os << '\n';
    }
}

Dataset load_dataset(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::invalid_argument("load_dataset: cannot open " + path);
    std::string line;
    int lineno = 0;
    if (!std::getline(is, line)) throw ParseError("load_dataset: missing header", 1);
    ++lineno;
    Dataset ds;
    std::string kind;
    unsigned long long seed = 0;
    int count = 0;
    {
        std::istringstream ss(line);
        if (!(ss >> kind >> ds.family.dim >> ds.family.m_lo >> ds.family.m_hi >>
              ds.family.n_lo >> ds.family.n_hi >> seed >> count)) {
            throw ParseError("load_dataset: bad header", lineno);
        }
    }
    if (kind == "forcing") {
        ds.family.kind = InputKind::Forcing;
    } else if (kind == "reaction") {
        ds.family.kind = InputKind::ReactionCoefficient;
    } else {
        throw ParseError("load_dataset: unknown family kind '" + kind + "'", lineno);
    }
    ds.family.validate();
    ds.seed = seed;
    const int osize = ds.family.omega_size();
    for (int m = 0; m < count; ++m) {
        if (!std::getline(is, line)) throw ParseError("load_dataset: missing sample line", lineno);
        ++lineno;
        std::istringstream ss(line);
        ForcingSample s;
        s.dim = ds.family.dim;
        s.omega.resize(osize);
        for (int k = 0; k < osize; ++k) {
            if (!(ss >> s.omega[k])) throw ParseError("load_dataset: bad omega vector", lineno);
        }
        ds.samples.push_back(std::move(s));
    }
    return ds;
}

void rebuild_loads(Dataset& ds, const LoadAssembler& assemble) {
    ds.loads.clear();
    ds.loads.reserve(ds.samples.size());
    for (const auto& s : ds.samples) {
        LoadVector load = assemble(forcing_field(s));
        load.omega = s.omega;
        ds.loads.push_back(std::move(load));
    }
}

}  // namespace feop
