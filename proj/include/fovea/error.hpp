#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fovea {

/// Base for every error the library throws.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// I/O failures carry the offending path.
class PathError : public Error
{
public:
    PathError(const std::string& what, std::string path)
        : Error(what + ": " + path), path_(std::move(path))
    {
    }

    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

class FileNotFound : public PathError
{
public:
    explicit FileNotFound(std::string path) : PathError("file not found", std::move(path)) {}
};

class DecodeError : public PathError
{
public:
    DecodeError(std::string path, const std::string& reason)
        : PathError("cannot decode image (" + reason + ")", std::move(path))
    {
    }
};

class WriteError : public PathError
{
public:
    WriteError(std::string path, const std::string& reason)
        : PathError("cannot write (" + reason + ")", std::move(path))
    {
    }
};

class DegenerateMask : public Error
{
public:
    DegenerateMask() : Error("field-of-view mask is empty") {}
};

class EmptyRegion : public Error
{
public:
    EmptyRegion() : Error("histogram region contains no pixels") {}
};

class TileTooSmall : public Error
{
public:
    TileTooSmall() : Error("equalization tile has fewer than 2 pixels") {}
};

class ConfigError : public Error
{
public:
    using Error::Error;
};

class ParseError : public Error
{
public:
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line)
    {
    }

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class SemanticError : public ParseError
{
public:
    using ParseError::ParseError;
};

class MissingTruth : public Error
{
public:
    explicit MissingTruth(std::string source)
        : Error("no ground truth for " + source), source_(std::move(source))
    {
    }

    const std::string& source() const noexcept { return source_; }

private:
    std::string source_;
};

class DuplicateTruth : public Error
{
public:
    explicit DuplicateTruth(std::string source)
        : Error("duplicate ground truth for " + source), source_(std::move(source))
    {
    }

    const std::string& source() const noexcept { return source_; }

private:
    std::string source_;
};

} // namespace fovea
