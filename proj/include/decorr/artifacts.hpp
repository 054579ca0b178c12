#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "decorr/compiler.hpp"
#include "decorr/evaluator.hpp"

namespace decorr {

// Artifact layout on disk. The untrusted directory is what ships with the
// program; the trusted directory stays with the key owner.
struct ArtifactPaths {
    std::filesystem::path root;

    std::filesystem::path untrusted_dir() const { return root / "untrusted"; }
    std::filesystem::path trusted_dir() const { return root / "trusted"; }
    std::filesystem::path listing() const { return untrusted_dir() / "obfuscated.txt"; }
    std::filesystem::path image() const { return untrusted_dir() / "image.bin"; }
    std::filesystem::path trace() const { return untrusted_dir() / "trace.jsonl"; }
    std::filesystem::path key() const { return trusted_dir() / "key.json"; }
    std::filesystem::path layout() const { return trusted_dir() / "layout.json"; }
    std::filesystem::path provenance() const { return trusted_dir() / "provenance.json"; }
};

void save_artifacts(const CompileResult& result, const ArtifactPaths& paths);

struct UntrustedArtifacts {
    ObfProgram program;
    std::vector<uint8_t> image;
};

UntrustedArtifacts load_untrusted(const ArtifactPaths& paths);
KeyMaterial load_key(const ArtifactPaths& paths); // throws Error when missing
ProvenanceMap load_provenance(const ArtifactPaths& paths);

std::string trace_to_jsonl(const std::vector<TraceStep>& steps);
std::vector<TraceStep> trace_from_jsonl(const std::string& text);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& content);
std::vector<uint8_t> read_binary_file(const std::filesystem::path& path);
void write_binary_file(const std::filesystem::path& path, const std::vector<uint8_t>& bytes);

} // namespace decorr
