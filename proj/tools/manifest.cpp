#include "manifest.hpp"

#include <openssl/evp.h>

#include <array>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <memory>

namespace pdcli {

const char* const kVersion = "1.0.0";

namespace {
struct MdCtxDeleter {
    void operator()(EVP_MD_CTX* c) const { EVP_MD_CTX_free(c); }
};
}  // namespace

std::string sha256_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read '" + path + "'");
    std::unique_ptr<EVP_MD_CTX, MdCtxDeleter> ctx(EVP_MD_CTX_new());
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("sha256: digest setup failed");
    std::array<char, 1 << 16> buf;
    while (in) {
        in.read(buf.data(), buf.size());
        if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), md, &len);
    static const char* hex = "0123456789abcdef";
    std::string s;
    for (unsigned int k = 0; k < len; ++k) {
        s += hex[md[k] >> 4];
        s += hex[md[k] & 15];
    }
    return s;
}

std::string utc_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

Manifest::Manifest(std::string command, const Settings& settings)
    : command_(std::move(command)), config_(to_json(settings)), seed_(settings.seed), started_(utc_now()) {}

void Manifest::add_input(const std::string& role, const std::string& path) {
    const std::string abs = std::filesystem::absolute(path).lexically_normal().string();
    inputs_.push_back({role, abs, sha256_file(path)});
}

void Manifest::write(const std::string& dir, int exit_code) {
    nlohmann::ordered_json j;
    j["tool"] = "pdnet";
    j["version"] = kVersion;
    j["command"] = command_;
    j["config"] = config_;
    j["seed"] = seed_;
    j["inputs"] = nlohmann::ordered_json::array();
    for (const auto& in : inputs_)
        j["inputs"].push_back({{"role", in.role}, {"path", in.path}, {"sha256", in.sha256}});
    j["outputs"] = outputs_;
    j["exit_code"] = exit_code;
    j["started_utc"] = started_;
    j["finished_utc"] = utc_now();
    std::ofstream out(std::filesystem::path(dir) / "manifest.json");
    out << j.dump(2) << '\n';
    if (!out) throw std::runtime_error("cannot write manifest in '" + dir + "'");
}

void check_manifest_inputs(const nlohmann::json& j, const std::string& command) {
    if (!j.is_object() || !j.contains("inputs")) return;
    if (j.contains("command") && j.at("command") != command)
        throw ConfigError("manifest was written by '" + j.at("command").get<std::string>() +
                          "', not '" + command + "'");
    for (const auto& in : j.at("inputs")) {
        const auto path = in.at("path").get<std::string>();
        if (sha256_file(path) != in.at("sha256").get<std::string>())
            throw ConfigError("input '" + path + "' changed since the manifest was written");
    }
}

}  // namespace pdcli
