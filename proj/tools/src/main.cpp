#include "commands.hpp"

int main(int argc, char** argv) { return embsp::cli::run(argc, argv); }
