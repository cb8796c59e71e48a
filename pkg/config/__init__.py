from config.defaults import get_cfg
