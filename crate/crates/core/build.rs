fn main() {
    for key in ["TARGET", "PROFILE"] {
        let value = std::env::var(key).unwrap_or_else(|_| "unknown".into());
        println!("cargo:rustc-env=LONGWAVE_BUILD_{key}={value}");
    }
    println!("cargo:rerun-if-changed=build.rs");
}
