#include "ggbm/ensemble_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

// the container is defined little-endian; this build writes raw object bytes
static_assert(std::endian::native == std::endian::little,
              "ensemble container requires a little-endian host");

namespace ggbm {

namespace {

constexpr char kMagic[4] = {'G', 'G', 'B', 'M'};

template <typename T>
void put(std::string& buf, T v) {
    char raw[sizeof(T)];
    std::memcpy(raw, &v, sizeof(T));
    buf.append(raw, sizeof(T));
}

template <typename T>
T take(std::istream& in, const char* what) {
    T v;
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in)
        throw std::runtime_error(std::string("ensemble file truncated in ") +
                                 what);
    return v;
}

std::string header_bytes(const SimConfig& c) {
    std::string buf;
    buf.append(kMagic, 4);
    put<std::uint16_t>(buf, kEnsembleFormatVersion);
    put<double>(buf, c.params.beta);
    put<double>(buf, c.params.alpha);
    put<std::int32_t>(buf, c.d);
    put<std::int32_t>(buf, c.n_steps);
    put<double>(buf, c.horizon);
    put<std::int64_t>(buf, c.n_paths);
    put<std::uint64_t>(buf, c.seed);
    return buf;
}

} // namespace

std::string ensemble_sidecar_text(const SimConfig& config) {
    nlohmann::json j;
    j["format"]["magic"] = "GGBM";
    j["format"]["version"] = kEnsembleFormatVersion;
    j["config"]["beta"] = config.params.beta;
    j["config"]["alpha"] = config.params.alpha;
    j["config"]["d"] = config.d;
    j["config"]["n_steps"] = config.n_steps;
    j["config"]["horizon"] = config.horizon;
    j["config"]["n_paths"] = config.n_paths;
    j["config"]["seed"] = config.seed;
    return j.dump(2) + "\n";
}

void save_ensemble(const PathEnsemble& ens, const std::string& path) {
    ens.config.validate();
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw std::runtime_error("cannot open for writing: " + path);
    const std::string head = header_bytes(ens.config);
    out.write(head.data(), static_cast<std::streamsize>(head.size()));
    out.write(reinterpret_cast<const char*>(ens.data.data()),
              static_cast<std::streamsize>(ens.data.size() * sizeof(double)));
    out.flush();
    if (!out)
        throw std::runtime_error("write failed: " + path);

    const std::string side = path + ".json";
    std::ofstream meta(side, std::ios::binary | std::ios::trunc);
    if (!meta)
        throw std::runtime_error("cannot open for writing: " + side);
    const std::string text = ensemble_sidecar_text(ens.config);
    meta.write(text.data(), static_cast<std::streamsize>(text.size()));
    meta.flush();
    if (!meta)
        throw std::runtime_error("write failed: " + side);
}

PathEnsemble load_ensemble(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open for reading: " + path);

    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0)
        throw std::runtime_error("not an ensemble container: " + path);
    const auto version = take<std::uint16_t>(in, "version");
    if (version != kEnsembleFormatVersion)
        throw std::runtime_error("unsupported ensemble format version " +
                                 std::to_string(version));

    const double beta = take<double>(in, "beta");
    const double alpha = take<double>(in, "alpha");
    const auto d = take<std::int32_t>(in, "d");
    const auto n_steps = take<std::int32_t>(in, "n_steps");
    const double horizon = take<double>(in, "horizon");
    const auto n_paths = take<std::int64_t>(in, "n_paths");
    const auto seed = take<std::uint64_t>(in, "seed");

    PathEnsemble ens;
    try {
        ens.config.params = GgbmParams(beta, alpha);
        ens.config.d = d;
        ens.config.n_steps = n_steps;
        ens.config.horizon = horizon;
        ens.config.n_paths = n_paths;
        ens.config.seed = seed;
        ens.config.validate();
    } catch (const std::domain_error& e) {
        throw std::runtime_error("ensemble file has an invalid config: " +
                                 std::string(e.what()));
    }

    const std::size_t count = static_cast<std::size_t>(n_paths) *
                              static_cast<std::size_t>(d) * ens.n_points();
    ens.data.resize(count);
    in.read(reinterpret_cast<char*>(ens.data.data()),
            static_cast<std::streamsize>(count * sizeof(double)));
    if (!in || static_cast<std::size_t>(in.gcount()) != count * sizeof(double))
        throw std::runtime_error("ensemble payload shorter than its config: " +
                                 path);
    char extra;
    in.read(&extra, 1);
    if (!in.eof())
        throw std::runtime_error("ensemble payload longer than its config: " +
                                 path);

    for (std::int64_t p = 0; p < ens.config.n_paths; ++p)
        for (int j = 0; j < ens.config.d; ++j) {
            const double* comp = ens.path_component(p, j);
            if (comp[0] != 0.0)
                throw std::runtime_error(
                    "ensemble path does not start at the origin: " + path);
            for (std::size_t i = 0; i < ens.n_points(); ++i)
                if (!std::isfinite(comp[i]))
                    throw std::runtime_error(
                        "ensemble contains a non-finite value: " + path);
        }
    return ens;
}

} // namespace ggbm
