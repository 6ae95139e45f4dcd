import argparse

import uvicorn

from .config import SidecarConfig
from .service import create_app


def main(argv=None) -> None:
    parser = argparse.ArgumentParser(
        prog="sam-sidecar", description="segmentation sidecar (stub or model mode)"
    )
    parser.add_argument("--mode", choices=("stub", "model"))
    parser.add_argument("--host")
    parser.add_argument("--port", type=int)
    parser.add_argument("--fixtures", help="fixture directory for stub mode")
    parser.add_argument("--detector-config")
    parser.add_argument("--detector-checkpoint")
    parser.add_argument("--mask-checkpoint")
    args = parser.parse_args(argv)

    overrides = {
        key: value
        for key, value in (
            ("mode", args.mode),
            ("host", args.host),
            ("port", args.port),
            ("fixture_dir", args.fixtures),
            ("detector_config_path", args.detector_config),
            ("detector_checkpoint_path", args.detector_checkpoint),
            ("mask_checkpoint_path", args.mask_checkpoint),
        )
        if value is not None
    }
    config = SidecarConfig.from_env(**overrides)
    # single worker on purpose: requests queue, the predictor is stateful
    uvicorn.run(create_app(config), host=config.host, port=config.port, workers=1)


if __name__ == "__main__":
    main()
