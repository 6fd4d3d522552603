#include "commands.hpp"

int main(int argc, char** argv) { return vlmprobe::cli::run(argc, argv); }
