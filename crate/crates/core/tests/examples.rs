// Each example is compiled into this test and run to completion.

macro_rules! example {
    ($name:ident) => {
        mod $name {
            #![allow(dead_code)]
            include!(concat!("../examples/", stringify!($name), ".rs"));

            #[test]
            fn runs() {
                main().unwrap();
            }
        }
    };
}

example!(operator_algebra);
example!(partition_census);
example!(solve_eod);
example!(external_schedule);
example!(locality);
example!(qpe_sectors);

mod pipeline {
    #![allow(dead_code)]
    include!("../examples/pipeline.rs");

    #[test]
    fn runs_on_the_fcidump_config() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/data/two_orbital.toml");
        run(cfg, dir.path().to_path_buf()).unwrap();
        assert!(dir.path().join("bundle.json").exists());
        assert!(dir.path().join("histogram.tsv").exists());
    }
}
