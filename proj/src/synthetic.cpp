#include "argda/synthetic.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace argda {

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(t);
    has_spare_ = true;
    return r * std::cos(t);
}

namespace {

Matrix draw_domain(const SyntheticSpec& s, Rng& rng) {
    const int n = s.classes * s.per_class;
    Matrix x = Matrix::Zero(s.dim, n);
    const int plane = std::min(s.dim, 2);
    for (int c = 0; c < s.classes; ++c) {
        const double a = 2.0 * std::numbers::pi * c / s.classes;
        for (int i = 0; i < s.per_class; ++i) {
            auto col = x.col(c * s.per_class + i);
            if (s.dim == 1) {
                col(0) = s.radius * c;
            } else if (s.kind == SyntheticKind::GaussianShift) {
                col(0) = s.radius * std::cos(a);
                col(1) = s.radius * std::sin(a);
            } else {
                const double t = a + std::numbers::pi * rng.uniform();
                col(0) = s.radius * std::cos(a) + std::cos(t);
                col(1) = s.radius * std::sin(a) + std::sin(t);
            }
            for (int d = 0; d < plane; ++d) col(d) += s.spread * rng.normal();
            for (int d = plane; d < s.dim; ++d) col(d) = s.noise * rng.normal();
        }
    }
    return x;
}

}  // namespace

SyntheticTask generate_synthetic(const SyntheticSpec& s) {
    if (s.classes < 1) throw Error("synthetic task needs at least one class");
    if (s.per_class < 1) throw Error("synthetic task needs at least one sample per class");
    if (s.dim < 1) throw Error("synthetic task needs at least one feature");

    Rng rng(s.seed);
    const Matrix source = draw_domain(s, rng);
    Matrix target = draw_domain(s, rng);

    if (s.dim >= 2) {
        const double th = s.rotation_deg * std::numbers::pi / 180.0;
        Eigen::Matrix2d rot;
        rot << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
        target.topRows(2) = (rot * target.topRows(2)).eval();
    }
    Vector dir = Vector::Zero(s.dim);
    if (s.dim > 2)
        dir.tail(s.dim - 2).setConstant(1.0 / std::sqrt(static_cast<double>(s.dim - 2)));
    else
        dir.setConstant(1.0 / std::sqrt(static_cast<double>(s.dim)));
    target.colwise() += s.offset * dir;

    const int n = s.classes * s.per_class;
    SyntheticTask task;
    task.features.resize(s.dim, 2 * n);
    task.features << source, target;
    task.split.n_source = n;
    task.split.n_target = n;
    task.split.classes = s.classes;
    task.split.source_labels.resize(n);
    for (int i = 0; i < n; ++i) task.split.source_labels[i] = i / s.per_class + 1;
    task.truth = task.split.source_labels;
    return task;
}

SyntheticSpec parse_synthetic_spec(const std::string& text) {
    SyntheticSpec s;
    std::string body = text;
    const auto colon = text.find(':');
    std::string kind = colon == std::string::npos ? "" : text.substr(0, colon);
    if (colon != std::string::npos) body = text.substr(colon + 1);
    if (colon == std::string::npos && text.find('=') == std::string::npos) {
        kind = text;
        body.clear();
    }
    if (kind == "gaussian_shift" || kind.empty())
        s.kind = SyntheticKind::GaussianShift;
    else if (kind == "two_moons_shift")
        s.kind = SyntheticKind::TwoMoonsShift;
    else
        throw Error("unknown synthetic kind '" + kind + "' (expected gaussian_shift or two_moons_shift)");

    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw Error("synthetic spec entry '" + item + "' is not key=value");
        const std::string key = item.substr(0, eq);
        const std::string val = item.substr(eq + 1);
        try {
            if (key == "classes") s.classes = std::stoi(val);
            else if (key == "per_class" || key == "n") s.per_class = std::stoi(val);
            else if (key == "dim") s.dim = std::stoi(val);
            else if (key == "offset") s.offset = std::stod(val);
            else if (key == "rotation") s.rotation_deg = std::stod(val);
            else if (key == "radius") s.radius = std::stod(val);
            else if (key == "spread") s.spread = std::stod(val);
            else if (key == "noise") s.noise = std::stod(val);
            else if (key == "seed") s.seed = std::stoull(val);
            else throw Error("unknown synthetic spec key '" + key + "'");
        } catch (const std::logic_error&) {
            throw Error("bad value '" + val + "' for synthetic spec key '" + key + "'");
        }
    }
    return s;
}

std::string to_string(const SyntheticSpec& s) {
    std::ostringstream os;
    os.precision(17);
    os << (s.kind == SyntheticKind::GaussianShift ? "gaussian_shift" : "two_moons_shift") << ":classes=" << s.classes
       << ",per_class=" << s.per_class << ",dim=" << s.dim << ",offset=" << s.offset << ",rotation=" << s.rotation_deg
       << ",radius=" << s.radius << ",spread=" << s.spread << ",noise=" << s.noise << ",seed=" << s.seed;
    return os.str();
}

}  // namespace argda
