#include "decorr/artifacts.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace decorr {

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out << content;
}

std::vector<uint8_t> read_binary_file(const std::filesystem::path& path) {
    std::string s = read_text_file(path);
    return {s.begin(), s.end()};
}

void write_binary_file(const std::filesystem::path& path, const std::vector<uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
}

void save_artifacts(const CompileResult& result, const ArtifactPaths& paths) {
    std::filesystem::create_directories(paths.untrusted_dir());
    std::filesystem::create_directories(paths.trusted_dir());
    write_text_file(paths.listing(), result.program.to_text());
    write_binary_file(paths.image(), result.image);
    write_text_file(paths.key(), result.key.to_json().dump(2) + "\n");
    write_text_file(paths.layout(), result.layout.to_json().dump(2) + "\n");
    write_text_file(paths.provenance(), result.provenance.to_json().dump(2) + "\n");
}

UntrustedArtifacts load_untrusted(const ArtifactPaths& paths) {
    UntrustedArtifacts a;
    a.program = ObfProgram::from_text(read_text_file(paths.listing()));
    a.image = read_binary_file(paths.image());
    return a;
}

KeyMaterial load_key(const ArtifactPaths& paths) {
    if (!std::filesystem::exists(paths.key()))
        throw Error("trusted material unavailable: " + paths.key().string());
    return KeyMaterial::from_json(nlohmann::json::parse(read_text_file(paths.key())));
}

ProvenanceMap load_provenance(const ArtifactPaths& paths) {
    if (!std::filesystem::exists(paths.provenance()))
        throw Error("trusted material unavailable: " + paths.provenance().string());
    return ProvenanceMap::from_json(nlohmann::json::parse(read_text_file(paths.provenance())));
}

std::string trace_to_jsonl(const std::vector<TraceStep>& steps) {
    std::ostringstream os;
    for (const auto& s : steps) {
        nlohmann::json j{{"step", s.step},   {"stmt", s.stmt},
                         {"op", s.op},       {"exec", s.executed},
                         {"ids", s.ids},     {"phys", s.phys},
                         {"shuffles", s.shuffles}};
        os << j.dump() << "\n";
    }
    return os.str();
}

std::vector<TraceStep> trace_from_jsonl(const std::string& text) {
    std::vector<TraceStep> steps;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line);
        TraceStep s;
        s.step = j.at("step").get<uint64_t>();
        s.stmt = j.at("stmt").get<uint32_t>();
        s.op = j.at("op").get<std::string>();
        s.executed = j.at("exec").get<bool>();
        s.ids = j.at("ids").get<std::vector<uint64_t>>();
        s.phys = j.at("phys").get<std::vector<uint32_t>>();
        s.shuffles = j.at("shuffles").get<uint32_t>();
        steps.push_back(std::move(s));
    }
    return steps;
}

} // namespace decorr
