fn main() {
    // Placeholder until the driver lands.
}
