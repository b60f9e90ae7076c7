#include "sfflab/cli/app.hpp"

int main(int argc, char** argv) { return sfflab::cli::run(argc, argv); }
