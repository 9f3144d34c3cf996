#include "slender/trajectory.hpp"

#include "slender/mcmc.hpp"

#include <bit>
#include <cstring>
#include <stdexcept>

static_assert(std::endian::native == std::endian::little,
              "trajectory format assumes a little-endian host");

namespace slender {

namespace {

constexpr char MAGIC[8] = {'S', 'L', 'N', 'D', 'R', 'T', 'J', '1'};
constexpr std::int32_t VERSION = 1;

template <class T> void put(std::ostream& o, const T& v) {
    o.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <class T> T get(std::istream& i) {
    T v;
    i.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!i) throw std::runtime_error("trajectory file truncated");
    return v;
}

} // namespace

bool TrajectoryFrame::operator==(const TrajectoryFrame& o) const {
    auto deq = [](double a, double b) { return std::memcmp(&a, &b, sizeof(double)) == 0; };
    if (!deq(time, o.time) || tau.size() != o.tau.size()) return false;
    for (size_t f = 0; f < tau.size(); f++) {
        if (tau[f].cols() != o.tau[f].cols()) return false;
        if (std::memcmp(tau[f].data(), o.tau[f].data(), sizeof(double) * tau[f].size()) != 0)
            return false;
        if (std::memcmp(midpoint[f].data(), o.midpoint[f].data(), 3 * sizeof(double)) != 0)
            return false;
    }
    return gmres_iterations == o.gmres_iterations && newton_failures == o.newton_failures &&
           contacts == o.contacts && cl_state == o.cl_state && cl_links == o.cl_links;
}

TrajectoryWriter::TrajectoryWriter(const std::string& path, const TrajectoryHeader& h)
    : out_(path, std::ios::binary), header_(h) {
    if (!out_) throw std::runtime_error("cannot open trajectory file for writing: " + path);
    out_.write(MAGIC, 8);
    put(out_, VERSION);
    put(out_, h.nfibers);
    put(out_, h.N);
    put(out_, h.L);
    put(out_, h.a);
    put(out_, h.kappa);
    put(out_, h.mu);
}

void TrajectoryWriter::append(const TrajectoryFrame& fr) {
    if (int(fr.tau.size()) != header_.nfibers)
        throw std::invalid_argument("frame fiber count does not match the header");
    put(out_, fr.time);
    put(out_, fr.gmres_iterations);
    put(out_, fr.newton_failures);
    put(out_, fr.contacts);
    for (int f = 0; f < header_.nfibers; f++) {
        out_.write(reinterpret_cast<const char*>(fr.tau[f].data()),
                   sizeof(double) * 3 * header_.N);
        out_.write(reinterpret_cast<const char*>(fr.midpoint[f].data()), sizeof(double) * 3);
    }
    put(out_, std::int64_t(fr.cl_state.size()));
    out_.write(reinterpret_cast<const char*>(fr.cl_state.data()),
               sizeof(std::int32_t) * fr.cl_state.size());
    put(out_, std::int64_t(fr.cl_links.size()));
    for (auto [p, q] : fr.cl_links) {
        put(out_, p);
        put(out_, q);
    }
    out_.flush();
}

std::vector<TrajectoryFrame> read_trajectory(const std::string& path, TrajectoryHeader& h) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open trajectory file: " + path);
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, MAGIC, 8) != 0)
        throw std::runtime_error("not a trajectory file: " + path);
    if (get<std::int32_t>(in) != VERSION)
        throw std::runtime_error("unsupported trajectory version");
    h.nfibers = get<std::int32_t>(in);
    h.N = get<std::int32_t>(in);
    h.L = get<double>(in);
    h.a = get<double>(in);
    h.kappa = get<double>(in);
    h.mu = get<double>(in);

    std::vector<TrajectoryFrame> frames;
    while (in.peek() != EOF) {
        TrajectoryFrame fr;
        fr.time = get<double>(in);
        fr.gmres_iterations = get<std::int32_t>(in);
        fr.newton_failures = get<std::int64_t>(in);
        fr.contacts = get<std::int64_t>(in);
        fr.tau.resize(h.nfibers);
        fr.midpoint.resize(h.nfibers);
        for (int f = 0; f < h.nfibers; f++) {
            fr.tau[f].resize(3, h.N);
            in.read(reinterpret_cast<char*>(fr.tau[f].data()), sizeof(double) * 3 * h.N);
            in.read(reinterpret_cast<char*>(fr.midpoint[f].data()), sizeof(double) * 3);
        }
        auto ns = get<std::int64_t>(in);
        fr.cl_state.resize(ns);
        in.read(reinterpret_cast<char*>(fr.cl_state.data()), sizeof(std::int32_t) * ns);
        auto nl = get<std::int64_t>(in);
        fr.cl_links.resize(nl);
        for (auto& [p, q] : fr.cl_links) {
            p = get<std::int32_t>(in);
            q = get<std::int32_t>(in);
        }
        if (!in) throw std::runtime_error("trajectory file truncated");
        frames.push_back(std::move(fr));
    }
    return frames;
}

void export_csv(const std::string& path, const std::vector<TrajectoryFrame>& frames,
                const DiscretizationOps& ops) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open csv file for writing: " + path);
    out.precision(12);
    out << "time,fiber,mp_x,mp_y,mp_z,end_to_end,vertical_extent\n";
    int Nx = ops.params.Nx();
    for (const auto& fr : frames)
        for (size_t f = 0; f < fr.tau.size(); f++) {
            auto shape = make_shape(fr.tau[f], fr.midpoint[f], ops);
            double zmin = 1e300, zmax = -1e300;
            for (int k = 0; k < Nx; k++) {
                double z = shape.X(3 * k + 2);
                zmin = std::min(zmin, z);
                zmax = std::max(zmax, z);
            }
            out << fr.time << ',' << f << ',' << fr.midpoint[f](0) << ','
                << fr.midpoint[f](1) << ',' << fr.midpoint[f](2) << ','
                << end_to_end_distance(shape, ops) << ',' << zmax - zmin << '\n';
        }
}

} // namespace slender
