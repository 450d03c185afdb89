def test_send_video_formatting_caption(self):
    with open('./test_data/test_video.mp4', 'rb') as file_data:
        tb = telebot.TeleBot(TOKEN)
        ret_msg = tb.send_video(CHAT_ID, file_data,
            caption='_italic_', parse_mode='Markdown')
        assert ret_msg.caption_entities[0].type=='italic'
