#include "pdegreedy/report_io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace pdegreedy {

void atomic_write_text(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    fs::path tmp = target;
    tmp += ".tmp";

    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
        out << content;
        if (!out.flush()) throw std::runtime_error("write to '" + tmp.string() + "' failed");
    }
    fs::rename(tmp, target);
}

std::string csv_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

nlohmann::ordered_json functional_to_json(const Functional& f) {
    nlohmann::ordered_json j;
    j["id"] = f.id;
    j["domain"] = f.domain_index;
    j["op"] = operator_name(f.op);
    auto pt = nlohmann::ordered_json::array();
    for (int i = 0; i < f.dim; ++i) pt.push_back(f.point[i]);
    j["point"] = pt;
    return j;
}

std::string nu_string(const RadialKernel& kernel) {
    return std::to_string(kernel.twice_nu()) + "/2";
}

nlohmann::ordered_json kernel_to_json(const RadialKernel& kernel) {
    nlohmann::ordered_json j;
    j["family"] = "matern";
    j["nu"] = nu_string(kernel);
    j["shape"] = kernel.shape();
    return j;
}

}  // namespace pdegreedy
